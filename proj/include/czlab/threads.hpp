#pragma once

namespace czlab {

/// Reads CZLAB_THREADS (a positive integer) and caps OpenMP at that many threads. Eigen itself is
/// kept single-threaded so dense products do not depend on the thread count.
int configure_threads();
int thread_count();
void set_thread_count(int n);

}  // namespace czlab
