#pragma once

#include <iosfwd>
#include <string>

namespace telesim {

/// Runs the full verification suite (exact benchmarks, two-route
/// consistency, protocol identities, figure-level qualitative properties,
/// and the timed figure reproduction). Prints one pass/fail line per
/// criterion; returns true when everything passed. Figure data lands under
/// out_dir.
bool run_acceptance(std::ostream& os, int threads = 0,
                    const std::string& out_dir = "acceptance-figures");

}  // namespace telesim
