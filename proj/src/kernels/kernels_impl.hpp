#pragma once

#include "mdrate/kernels/kernels.hpp"

namespace mdrate::kernels {

extern const Table kScalarTable;
extern const Table kAvx2Table;

}  // namespace mdrate::kernels
