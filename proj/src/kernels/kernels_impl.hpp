#pragma once

#include "sdl/kernels.hpp"

namespace sdl::kernels::detail {

extern const KernelTable kScalarTable;
#if defined(SDL_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

}  // namespace sdl::kernels::detail
