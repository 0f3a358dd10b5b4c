// category: secure
//@ heap 2;
void f(int v, bool b, int* highptr, int* lowptr)
//@ logical x.v in {0..3}, x.b in {0, 1}, x.h in {@0, @1}, x.l in {@0, @1};
//@ pre PROP(x.h != x.l) LOCAL(v = x.v, b = x.b, highptr = x.h, lowptr = x.l)
//@     SEP(x.h |-> _, x.l |-> _),
//@     [b: Lo, highptr: Hi, lowptr: Lo, v: (x.b ? Hi : Lo)], [x.l: Lo, x.h: Hi];
//@ post (nrm: PROP() LOCAL() SEP(x.h |-> (x.b ? x.v : _), x.l |-> (x.b ? _ : x.v)),
//@     [], [x.l: Lo, x.h: Hi]);
{
  if (b) {
    *highptr = v;
  } else {
    *lowptr = v;
  }
}
