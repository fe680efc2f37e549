#pragma once

#include <stdexcept>
#include <string>

namespace polestim {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad ranges, unknown keys, schema).
struct config_error : error {
    using error::error;
};

/// File-system and format failures (missing files, malformed OBJ/PGM/CSV).
struct io_error : error {
    using error::error;
};

/// Numerical degeneracy: rank-deficient systems, undefined angles,
/// constant images where correlation is requested.
struct degenerate_error : error {
    using error::error;
};

/// The rendered silhouette touched the image border, so the body is not
/// fully contained in the field of view.
struct fov_error : error {
    using error::error;
};

}  // namespace polestim
