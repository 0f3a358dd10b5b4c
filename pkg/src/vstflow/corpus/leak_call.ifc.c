// category: insecure call
int id(int a)
//@ logical x.a in {0..1};
//@ pre PROP() LOCAL(a = x.a) SEP(), [a: Hi], [];
//@ post (ret: PROP() LOCAL(ret_val = x.a) SEP(), [ret_val: Hi], []);
{
  return a;
}

void leak_call(int pub, int sec)
//@ logical x.p in {0..1}, x.s in {0..1};
//@ pre PROP() LOCAL(pub = x.p, sec = x.s) SEP(), [pub: Lo, sec: Hi], [];
//@ post (nrm: PROP() LOCAL() SEP(), [pub: Lo], []);
{
  pub = id(sec);
}
