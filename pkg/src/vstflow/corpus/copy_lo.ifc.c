// category: secure
void copy_lo(int pub, int sec)
//@ logical x.p in {0..2}, x.s in {0..2};
//@ pre PROP() LOCAL(pub = x.p, sec = x.s) SEP(), [pub: Lo, sec: Hi], [];
//@ post (nrm: PROP() LOCAL() SEP(), [pub: Lo, t: Lo], []);
{
  int t;
  t = pub + 1;
  pub = t * 2;
}
