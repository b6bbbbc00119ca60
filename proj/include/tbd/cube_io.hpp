#pragma once

#include "tbd/radar_measurement.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace tbd {

/// Radar cube binary record, little-endian:
///   "TBDC" | u32 version=1 | u32 n_range | u32 n_velocity | u32 n_azimuth |
///   f64 range_res, velocity_res, azimuth_res, range_offset, velocity_offset, azimuth_offset |
///   f64 timestamp | f64 intensities[n_range * n_velocity * n_azimuth]
/// A cube file is a concatenation of such records, one per frame.
inline constexpr std::uint32_t kCubeFormatVersion = 1;

class CubeFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_cube(std::ostream& out, const RadarCube& cube);

/// Reads one record. Returns false at a clean end of stream; throws
/// CubeFormatError on a truncated or malformed record.
bool read_cube(std::istream& in, RadarCube& cube);

void write_cube_file(const std::filesystem::path& path, const std::vector<RadarCube>& cubes);
std::vector<RadarCube> read_cube_file(const std::filesystem::path& path);

} // namespace tbd
