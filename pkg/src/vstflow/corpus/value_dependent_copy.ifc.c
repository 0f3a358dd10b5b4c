// category: secure value-dependent
void value_dependent_copy(int v, bool b)
//@ logical x.v in {0..2}, x.b in {0, 1};
//@ pre PROP() LOCAL(v = x.v, b = x.b) SEP(), [b: Lo, v: (x.b ? Hi : Lo)], [];
//@ post (nrm: PROP() LOCAL() SEP(), [b: Lo, out: (x.b ? Hi : Lo)], []);
{
  int out;
  out = v + 1;
}
