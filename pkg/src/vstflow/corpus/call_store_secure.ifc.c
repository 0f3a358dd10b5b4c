// category: secure call
//@ heap 2;
void put(int* p, int v)
//@ logical x.p in {@0, @1}, x.v in {0..2};
//@ pre PROP() LOCAL(p = x.p, v = x.v) SEP(x.p |-> _), [p: Lo, v: Lo], [x.p: Lo];
//@ post (nrm: PROP() LOCAL() SEP(x.p |-> x.v), [], [x.p: Lo]);
{
  *p = v;
}

void call_store_secure(int pub, int sec, int* lowptr, int* highptr)
//@ logical x.u in {0..2}, x.s in {0..2}, x.l in {@0, @1}, x.h in {@0, @1};
//@ pre PROP() LOCAL(pub = x.u, sec = x.s, lowptr = x.l, highptr = x.h)
//@     SEP(x.l |-> _, x.h |-> _),
//@     [pub: Lo, sec: Hi, lowptr: Lo, highptr: Lo], [x.l: Lo, x.h: Hi];
//@ post (nrm: PROP() LOCAL() SEP(x.l |-> x.u, x.h |-> _), [], [x.l: Lo, x.h: Hi]);
{
  put(lowptr, pub);
  *highptr = sec;
}
