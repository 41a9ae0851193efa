#include "czlab/threads.hpp"

#include <cstdlib>
#include <string>

#include <Eigen/Core>
#include <omp.h>

#include "czlab/error.hpp"

namespace czlab {

int configure_threads() {
    Eigen::setNbThreads(1);
    if (const char* env = std::getenv("CZLAB_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1) throw ConfigError(std::string("CZLAB_THREADS must be a positive integer, got ") + env);
        omp_set_num_threads(static_cast<int>(v));
    }
    return thread_count();
}

int thread_count() { return omp_get_max_threads(); }

void set_thread_count(int n) { omp_set_num_threads(n < 1 ? 1 : n); }

}  // namespace czlab
