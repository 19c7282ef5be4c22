#pragma once

#include <iosfwd>
#include <string>

#include "procdisc/sdp/problem.hpp"

namespace procdisc::sdp {

/// Write the problem in SDPA sparse format (.dat-s).
///
/// The file encodes the realified problem
///   max Tr(F_0 Y)  s.t.  Tr(F_i Y) = b_i,  Y >= 0
/// with F = (1/2) [[Re H, -Im H], [Im H, Re H]] for each Hermitian datum H,
/// so the file optimum equals the complex optimum (negated for a Minimize
/// problem, whose F_0 is -C). Output is deterministic: sorted entries,
/// 17 significant digits, LF line endings.
void export_sdpa(const HermitianSdp& p, std::ostream& os);

void export_sdpa_file(const HermitianSdp& p, const std::string& path);

}  // namespace procdisc::sdp
