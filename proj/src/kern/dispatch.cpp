#include "feasimap/kern/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace feasimap::kern {
namespace {

const Ops& select() {
  if (const char* env = std::getenv("FEASIMAP_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return scalar_ops();
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return avx2_ops();
  }
  return avx2_supported() ? avx2_ops() : scalar_ops();
}

}  // namespace

const Ops& ops() {
  static const Ops& table = select();
  return table;
}

}  // namespace feasimap::kern
