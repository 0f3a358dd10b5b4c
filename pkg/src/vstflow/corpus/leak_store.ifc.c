// category: insecure
//@ heap 2;
void leak_store(int sec, int* lowptr)
//@ logical x.s in {0..1}, x.l in {@0, @1};
//@ pre PROP() LOCAL(sec = x.s, lowptr = x.l) SEP(x.l |-> _), [sec: Hi, lowptr: Lo], [x.l: Lo];
//@ post (nrm: PROP() LOCAL() SEP(x.l |-> _), [], [x.l: Lo]);
{
  *lowptr = sec;
}
