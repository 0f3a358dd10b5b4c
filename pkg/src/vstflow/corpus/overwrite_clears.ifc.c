// category: secure
void overwrite_clears(int pub, int sec)
//@ logical x.p in {0..2}, x.s in {0..2};
//@ pre PROP() LOCAL(pub = x.p, sec = x.s) SEP(), [pub: Lo, sec: Hi], [];
//@ post (nrm: PROP() LOCAL() SEP(), [pub: Lo], []);
{
  pub = sec;
  pub = 0;
}
