// category: insecure hi-branch loop
void leak_loop_break(int pub, int sec)
//@ logical x.p in {0..1}, x.s in {0..1};
//@ pre PROP() LOCAL(pub = x.p, sec = x.s) SEP(), [pub: Lo, sec: Hi], [];
//@ post (nrm: PROP() LOCAL() SEP(), [pub: Lo, i: Lo], []);
{
  int i;
  i = 0;
  //@ invariant EX k in {0..2}. PROP(k < 3) LOCAL(pub = x.p, sec = x.s, i = k) SEP(), [pub: Lo, sec: Hi, i: Lo], [];
  while (i < 2) {
    if (sec == i) {
      break;
    }
    i = i + 1;
  }
}
