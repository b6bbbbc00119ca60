#include "tbd/cube_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace tbd {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
    return v;
}

template <typename T>
void put(std::ostream& out, T v) {
    v = to_little(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) throw CubeFormatError("truncated cube record");
    return to_little(v);
}

constexpr char kMagic[4] = {'T', 'B', 'D', 'C'};

} // namespace

void write_cube(std::ostream& out, const RadarCube& cube) {
    cube.validate();
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kCubeFormatVersion);
    const CellGrid& g = cube.grid;
    put<std::uint32_t>(out, g.n_range);
    put<std::uint32_t>(out, g.n_velocity);
    put<std::uint32_t>(out, g.n_azimuth);
    for (double v : {g.range_res, g.velocity_res, g.azimuth_res, g.range_offset, g.velocity_offset, g.azimuth_offset}) {
        put<double>(out, v);
    }
    put<double>(out, cube.timestamp);
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(cube.intensities.data()),
                  static_cast<std::streamsize>(cube.intensities.size() * sizeof(double)));
    } else {
        for (double z : cube.intensities) put<double>(out, z);
    }
    if (!out) throw CubeFormatError("failed writing cube record");
}

bool read_cube(std::istream& in, RadarCube& cube) {
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() == 0 && in.eof()) return false;
    if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) throw CubeFormatError("bad cube magic");
    const auto version = get<std::uint32_t>(in);
    if (version != kCubeFormatVersion) {
        throw CubeFormatError("unsupported cube format version " + std::to_string(version));
    }
    CellGrid g;
    g.n_range = get<std::uint32_t>(in);
    g.n_velocity = get<std::uint32_t>(in);
    g.n_azimuth = get<std::uint32_t>(in);
    g.range_res = get<double>(in);
    g.velocity_res = get<double>(in);
    g.azimuth_res = get<double>(in);
    g.range_offset = get<double>(in);
    g.velocity_offset = get<double>(in);
    g.azimuth_offset = get<double>(in);
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw CubeFormatError(std::string("bad cube header: ") + e.what());
    }
    cube.grid = g;
    cube.timestamp = get<double>(in);
    cube.intensities.resize(g.cell_count());
    const auto bytes = static_cast<std::streamsize>(cube.intensities.size() * sizeof(double));
    in.read(reinterpret_cast<char*>(cube.intensities.data()), bytes);
    if (in.gcount() != bytes) throw CubeFormatError("truncated cube payload");
    if constexpr (std::endian::native == std::endian::big) {
        for (double& z : cube.intensities) z = to_little(z);
    }
    try {
        cube.validate();
    } catch (const std::invalid_argument& e) {
        throw CubeFormatError(e.what());
    }
    return true;
}

void write_cube_file(const std::filesystem::path& path, const std::vector<RadarCube>& cubes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CubeFormatError("cannot open " + path.string() + " for writing");
    for (const auto& c : cubes) write_cube(out, c);
}

std::vector<RadarCube> read_cube_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CubeFormatError("cannot open cube file " + path.string());
    std::vector<RadarCube> cubes;
    RadarCube cube;
    while (read_cube(in, cube)) cubes.push_back(cube);
    return cubes;
}

} // namespace tbd
