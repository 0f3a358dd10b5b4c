// category: secure
//@ heap 2;
void store_lo(int pub, int* lowptr)
//@ logical x.p in {0..2}, x.l in {@0, @1};
//@ pre PROP() LOCAL(pub = x.p, lowptr = x.l) SEP(x.l |-> _), [pub: Lo, lowptr: Lo], [x.l: Lo];
//@ post (nrm: PROP() LOCAL() SEP(x.l |-> x.p), [], [x.l: Lo]);
{
  *lowptr = pub;
}
