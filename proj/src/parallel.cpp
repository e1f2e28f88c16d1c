#include "fuse/parallel.hpp"

namespace fuse {

void set_threads(int n) {
#ifdef _OPENMP
    static const int hw_default = omp_get_max_threads();
    omp_set_num_threads(n > 0 ? n : hw_default);
#else
    (void)n;
#endif
}

} // namespace fuse
