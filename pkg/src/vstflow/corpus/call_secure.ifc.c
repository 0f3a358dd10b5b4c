// category: secure call
int inc(int a)
//@ logical x.a in {0..3};
//@ pre PROP() LOCAL(a = x.a) SEP(), [a: Lo], [];
//@ post (ret: PROP() LOCAL(ret_val = x.a + 1) SEP(), [ret_val: Lo], []);
{
  return a + 1;
}

void call_secure(int pub, int sec)
//@ logical x.p in {0..2}, x.s in {0..2};
//@ pre PROP() LOCAL(pub = x.p, sec = x.s) SEP(), [pub: Lo, sec: Hi], [];
//@ post (nrm: PROP() LOCAL() SEP(), [pub: Lo], []);
{
  pub = inc(pub);
}
