// category: secure loop
void skip_one(int n, int sec)
//@ logical x.n in {0..2}, x.s in {0..1};
//@ pre PROP() LOCAL(n = x.n, sec = x.s) SEP(), [n: Lo, sec: Hi], [];
//@ post (nrm: PROP() LOCAL() SEP(), [n: Lo, i: Lo, acc: Lo], []);
{
  int i;
  int acc;
  i = 0;
  acc = 0;
  //@ invariant EX k in {0..3}, a in {0..3}. PROP(k < x.n + 1, a < k + 1)
  //@     LOCAL(n = x.n, sec = x.s, i = k, acc = a) SEP(), [n: Lo, sec: Hi, i: Lo, acc: Lo], [];
  //@ incr_invariant EX k in {0..3}, a in {0..3}. PROP(k < x.n, a < k + 2)
  //@     LOCAL(n = x.n, sec = x.s, i = k, acc = a) SEP(), [n: Lo, sec: Hi, i: Lo, acc: Lo], [];
  loop (i = i + 1;) {
    if (n < i + 1) {
      break;
    }
    if (i == 1) {
      continue;
    }
    acc = acc + 1;
  }
}
