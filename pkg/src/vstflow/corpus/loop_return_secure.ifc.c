// category: secure loop
int find(int n, int sec)
//@ logical x.n in {0..3}, x.s in {0..1};
//@ pre PROP() LOCAL(n = x.n, sec = x.s) SEP(), [n: Lo, sec: Hi], [];
//@ post (ret: PROP() LOCAL() SEP(), [ret_val: Lo], []);
{
  int i;
  i = 0;
  //@ invariant EX k in {0..3}. PROP(k < 3) LOCAL(n = x.n, sec = x.s, i = k) SEP(), [n: Lo, sec: Hi, i: Lo], [];
  while (i < 2) {
    if (i == n) {
      return i;
    }
    i = i + 1;
  }
  return 9;
}
