// category: secure
//@ heap 2;
void load_hi_into_hi(int pub, int sec, int* hp)
//@ logical x.p in {0..2}, x.s in {0..2}, x.h in {@0, @1}, x.c in {0..2};
//@ pre PROP() LOCAL(pub = x.p, sec = x.s, hp = x.h) SEP(x.h |-> x.c), [pub: Lo, sec: Hi, hp: Lo], [x.h: Hi];
//@ post (nrm: PROP() LOCAL() SEP(), [pub: Lo, hp: Lo], [x.h: Hi]);
{
  int t;
  t = *hp;
  sec = t + sec;
}
