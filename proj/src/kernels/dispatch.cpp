#include <atomic>
#include <cstdlib>
#include <string>
#include <string_view>

#include "swlqr/errors.hpp"
#include "swlqr/kernels.hpp"

namespace swlqr::kernels {

const char* to_string(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "scalar";
}

const KernelTable* table_for(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return &detail::scalar_table();
        case Isa::Avx2: return detail::avx2_table();
        case Isa::Neon: return detail::neon_table();
    }
    return nullptr;
}

namespace {

const KernelTable* pick_default() {
    if (const char* env = std::getenv("SWLQR_ISA")) {
        const std::string_view name(env);
        for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
            if (name == to_string(isa))
                if (const KernelTable* t = table_for(isa)) return t;
    }
    for (Isa isa : {Isa::Avx2, Isa::Neon})
        if (const KernelTable* t = table_for(isa)) return t;
    return &detail::scalar_table();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{pick_default()};
    return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

Isa set_active(Isa isa) {
    const KernelTable* t = table_for(isa);
    if (t == nullptr)
        throw ValidationError(ErrorCode::InvalidArgument, std::string("instruction set unavailable: ") + to_string(isa));
    return current().exchange(t)->isa;
}

}  // namespace swlqr::kernels
