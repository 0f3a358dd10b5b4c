// category: secure
void lo_branch(int pub, int sec)
//@ logical x.p in {0..3}, x.s in {0..2};
//@ pre PROP() LOCAL(pub = x.p, sec = x.s) SEP(), [pub: Lo, sec: Hi], [];
//@ post (nrm: PROP() LOCAL() SEP(), [pub: Lo], []);
{
  if (pub < 2) {
    pub = pub + 1;
  } else {
    pub = 0;
  }
  sec = pub;
}
