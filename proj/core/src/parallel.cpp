#include "clk/parallel.hpp"

namespace clk {

int& worker_threads() {
    static int count = 0;  // 0 = hardware concurrency
    return count;
}

}  // namespace clk
