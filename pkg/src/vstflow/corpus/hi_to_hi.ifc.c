// category: secure
void hi_to_hi(int pub, int sec)
//@ logical x.p in {0..2}, x.s in {0..2};
//@ pre PROP() LOCAL(pub = x.p, sec = x.s) SEP(), [pub: Lo, sec: Hi], [];
//@ post (nrm: PROP() LOCAL() SEP(), [pub: Lo, sec: Hi], []);
{
  sec = sec + pub;
  pub = pub - 1;
}
