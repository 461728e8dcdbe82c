#pragma once

namespace tfde {

// Serial paths are the reference implementations kept for testing and benchmarking.
enum class Exec { Serial, Parallel };

}  // namespace tfde
