#pragma once

#include <string>

#include "hklab/dynamics.hpp"
#include "hklab/markov.hpp"
#include "hklab/space.hpp"

namespace hklab::io {

/// Space file: {"points": [...], "dist": [[...]], "neighbors": [[...]]} or
/// {"coords": [[...]], "metric": "euclidean", "neighbor_radius": r}.
FiniteMetricSpace load_space(const std::string& path);
void save_space(const FiniteMetricSpace& space, const std::string& path,
                const std::string& manifest_ref = "");

/// Measure file: one weight per line, index-aligned with the space's points.
DiscreteMeasure load_measure(const std::string& path);
void save_measure(const DiscreteMeasure& mu, const std::string& path,
                  const std::string& manifest_ref = "");

/// Kernel file: n rows of n comma-separated reals.
MarkovKernel load_kernel(const std::string& path);
void save_kernel(const MarkovKernel& kernel, const std::string& path,
                 const std::string& manifest_ref = "");

/// DecaySeries file: header + time,value,stderr,envelope rows.  A nonempty
/// manifest_ref is recorded as a leading comment line.
void save_decay_series(const DecaySeries& series, const std::string& path,
                       const std::string& manifest_ref = "");
DecaySeries load_decay_series(const std::string& path);

/// shortest round-trip decimal representation
std::string format_double(double x);

/// fixed 12-significant-digit form used in JSON reports
double round_12sig(double x);

/// FNV-1a content digest of a file, as 16 hex characters
std::string file_digest(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace hklab::io
