#pragma once

#include <iosfwd>
#include <string>

#include "chebrec/recovery.hpp"

namespace chebrec {

/// Writes a recovery map as versioned structured text (tag "chebrec-map 1").
/// All reals carry 17 significant digits, so save -> load -> save reproduces
/// the bytes exactly. Custom bases have no serializable descriptor and are
/// rejected with config_error.
void save_map(const PiecewiseRecoveryMap& map, std::ostream& out);
void save_map(const PiecewiseRecoveryMap& map, const std::string& path);

/// Reconstructs a map saved by save_map. The basis is rebuilt from its
/// descriptor (re-running the construction-time Chebyshev check); supports
/// and LU factors are taken from the file verbatim. Malformed or
/// version-mismatched input raises io_error.
[[nodiscard]] PiecewiseRecoveryMap load_map(std::istream& in,
                                            const ValidationOptions& validation = {});
[[nodiscard]] PiecewiseRecoveryMap load_map(const std::string& path,
                                            const ValidationOptions& validation = {});

}  // namespace chebrec
