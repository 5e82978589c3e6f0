#include "rk/parallel.hpp"

#include <atomic>

namespace rk {

namespace {
std::atomic<int> g_jobs{0};
}

void set_jobs(int jobs) { g_jobs.store(jobs < 0 ? 0 : jobs); }

int jobs() { return g_jobs.load(); }

}  // namespace rk
