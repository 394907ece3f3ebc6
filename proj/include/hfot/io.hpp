#pragma once

#include <cstdint>
#include <string>

#include "hfot/fields.hpp"
#include "hfot/forward.hpp"
#include "json.hpp"

namespace hfot {

/// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Binary sinogram: "HRTS", u16 version, u32 n_s, u32 n_theta, f64 r, D, omega,
/// (re, im) f64 pairs s-major, u64 length + JSON metadata. Little-endian.
void write_sinogram(const std::string& path, const Sinogram& sino);
Sinogram read_sinogram(const std::string& path);

/// Binary grid: "HRTG", u16 version, u32 cells, f64 r, node values row by row,
/// u64 length + JSON metadata.
void write_grid(const std::string& path, const ScalarField& f, const nlohmann::json& meta = nlohmann::json::object());
ScalarField read_grid(const std::string& path, nlohmann::json* meta = nullptr);

/// x,y,value rows for every node.
void write_grid_csv(const std::string& path, const ScalarField& f);

/// Writes a whole file or throws; nothing is left behind on failure.
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace hfot
