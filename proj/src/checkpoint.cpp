#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "dietsim/errors.hpp"
#include "dietsim/fdtd.hpp"

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace dietsim {

namespace {

constexpr std::array<char, 8> magic{'D', 'I', 'E', 'T', 'C', 'K', 'P', 'T'};

template <class T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_array(std::ofstream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

template <class T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw InvalidParameter("checkpoint: truncated header");
    return v;
}

void get_array(std::ifstream& in, std::vector<double>& v, std::size_t n) {
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw InvalidParameter("checkpoint: truncated data");
}

}  // namespace

void write_checkpoint(const SimulationState& state, const Grid1D& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidParameter("checkpoint: cannot open " + path.string());
    out.write(magic.data(), magic.size());
    put<std::uint32_t>(out, checkpoint_version);
    put<std::uint32_t>(out, 0);
    put<std::uint64_t>(out, state.e_x.size());
    put<std::uint64_t>(out, grid.slab_size());
    put<std::uint64_t>(out, state.species.size());
    put<std::uint64_t>(out, state.step);
    put<double>(out, state.clock);
    put<double>(out, grid.dz);
    put<double>(out, grid.dt);
    put_array(out, state.e_x);
    put_array(out, state.h_y);
    put_array(out, state.p_x);
    for (const SpeciesState& s : state.species) {
        for (const auto* v : {&s.p, &s.p_prev, &s.p_prev2, &s.e_local, &s.rho00, &s.rho11, &s.re, &s.im})
            put_array(out, *v);
    }
    if (!out) throw InvalidParameter("checkpoint: write failed for " + path.string());
}

SimulationState read_checkpoint(const std::filesystem::path& path, const Grid1D& grid, std::size_t species_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidParameter("checkpoint: cannot open " + path.string());
    std::array<char, 8> head{};
    in.read(head.data(), head.size());
    if (!in || head != magic) throw InvalidParameter("checkpoint: bad magic");
    if (get<std::uint32_t>(in) != checkpoint_version) throw InvalidParameter("checkpoint: unsupported version");
    (void)get<std::uint32_t>(in);
    const auto nz = get<std::uint64_t>(in);
    const auto slab = get<std::uint64_t>(in);
    const auto ns = get<std::uint64_t>(in);
    SimulationState state;
    state.step = get<std::uint64_t>(in);
    state.clock = get<double>(in);
    const double dz = get<double>(in);
    const double dt = get<double>(in);
    if (nz != grid.nz || slab != grid.slab_size() || ns != species_count || dz != grid.dz || dt != grid.dt)
        throw InvalidParameter("checkpoint: shape does not match the grid");
    get_array(in, state.e_x, nz);
    get_array(in, state.h_y, nz - 1);
    get_array(in, state.p_x, nz);
    for (std::size_t s = 0; s < ns; ++s) {
        SpeciesState sp;
        for (auto* v : {&sp.p, &sp.p_prev, &sp.p_prev2, &sp.e_local, &sp.rho00, &sp.rho11, &sp.re, &sp.im})
            get_array(in, *v, slab);
        state.species.push_back(std::move(sp));
    }
    return state;
}

}  // namespace dietsim
