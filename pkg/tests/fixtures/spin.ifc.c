void spin(int pub)
//@ logical x.p in {0..1};
//@ pre PROP() LOCAL(pub = x.p) SEP(), [pub: Lo], [];
//@ post (nrm: PROP() LOCAL() SEP(), [pub: Lo], []);
{
  //@ invariant PROP() LOCAL() SEP(), [pub: Lo], [];
  while (1) {
    skip;
  }
}
