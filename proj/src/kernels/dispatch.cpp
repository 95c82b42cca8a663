#include <cstdlib>
#include <string>

#include "dietsim/errors.hpp"
#include "dietsim/kernels.hpp"

namespace dietsim::kernels {

const KernelTable& select_kernels(std::string_view preference) {
    if (preference == "scalar") return scalar_kernels();
    if (preference == "auto" || preference == "avx2" || preference.empty()) {
        if (const KernelTable* avx2 = avx2_kernels()) return *avx2;
        return scalar_kernels();
    }
    throw InvalidParameter("unknown kernel variant '" + std::string(preference) + "' (auto, scalar, avx2)");
}

const KernelTable& default_kernels() {
    const char* env = std::getenv("DIETSIM_KERNELS");
    return select_kernels(env ? std::string_view(env) : std::string_view("auto"));
}

}  // namespace dietsim::kernels
