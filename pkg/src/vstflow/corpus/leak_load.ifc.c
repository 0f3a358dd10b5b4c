// category: insecure
//@ heap 2;
void leak_load(int pub, int* highptr)
//@ logical x.p in {0..1}, x.h in {@0, @1}, x.c in {0..1};
//@ pre PROP() LOCAL(pub = x.p, highptr = x.h) SEP(x.h |-> x.c), [pub: Lo, highptr: Lo], [x.h: Hi];
//@ post (nrm: PROP() LOCAL() SEP(), [pub: Lo], [x.h: Hi]);
{
  pub = *highptr;
}
