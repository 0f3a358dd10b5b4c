// category: incomplete hi-branch value-dependent
void vd_branch(int v, bool b)
//@ logical x.v in {0..1}, x.b in {0, 1};
//@ pre PROP() LOCAL(v = x.v, b = x.b) SEP(), [b: Lo, v: (x.b ? Hi : Lo)], [];
//@ post (nrm: PROP() LOCAL() SEP(), [b: Lo, out: Lo], []);
{
  int out;
  if (v == 0) {
    out = 1;
  } else {
    out = 1;
  }
}
