// category: insecure
void leak_assign(int pub, int sec)
//@ logical x.p in {0..1}, x.s in {0..1};
//@ pre PROP() LOCAL(pub = x.p, sec = x.s) SEP(), [pub: Lo, sec: Hi], [];
//@ post (nrm: PROP() LOCAL() SEP(), [pub: Lo], []);
{
  pub = sec;
}
