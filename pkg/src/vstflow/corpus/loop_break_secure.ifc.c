// category: secure loop
int count_to(int n, int sec)
//@ logical x.n in {0..3}, x.s in {0..1};
//@ pre PROP() LOCAL(n = x.n, sec = x.s) SEP(), [n: Lo, sec: Hi], [];
//@ post (ret: PROP() LOCAL() SEP(), [ret_val: Lo], []);
{
  int i;
  i = 0;
  //@ invariant EX k in {0..4}. PROP(k < x.n + 1) LOCAL(n = x.n, sec = x.s, i = k) SEP(),
  //@     [n: Lo, sec: Hi, i: Lo], [];
  while (1) {
    if (i == n) {
      break;
    }
    i = i + 1;
  }
  return i;
}
