#pragma once

namespace seqtran {

// Upper bound on the number of threads the OpenMP kernels may use.
// n <= 0 restores the hardware default. All kernels reduce in a fixed
// index order, so results do not depend on this setting.
void set_max_threads(int n);
int max_threads();

} // namespace seqtran
