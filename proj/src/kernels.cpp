#include "stkde/kernels.hpp"

namespace stkde {

KernelId parse_kernel(const std::string& name) {
  if (name == "epanechnikov") {
    return KernelId::Epanechnikov;
  }
  throw ValidationError("unknown kernel '" + name + "' (available: epanechnikov)");
}

std::string kernel_name(KernelId id) {
  switch (id) {
    case KernelId::Epanechnikov:
      return "epanechnikov";
  }
  return "?";
}

}  // namespace stkde
