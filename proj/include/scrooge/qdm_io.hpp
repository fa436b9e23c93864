#pragma once

#include "scrooge/types.hpp"

#include <iosfwd>
#include <string>

namespace scrooge {

// Canonical density-matrix file formats.
//
// JSON ("qdm-json-1"):
//   {"format":"qdm-json-1","dim":d,"factor_dims":[...],"re":[[...]],"im":[[...]]}
// with re/im given as d rows of d entries (row-major).
//
// Binary ("QDM1"): magic bytes "QDM1", little-endian u64 dim, u64 factor
// count, the factor dims as u64, then d*d interleaved (re, im) f64 pairs in
// row-major order.

void save_qdm_json(const DensityMatrix& rho, const std::string& path);
void save_qdm_binary(const DensityMatrix& rho, const std::string& path);

// Sniffs the format from the leading bytes. Parse errors carry a byte offset.
DensityMatrix load_qdm(const std::string& path);

std::string qdm_json_string(const DensityMatrix& rho);
DensityMatrix qdm_from_json_string(const std::string& text);

}  // namespace scrooge
