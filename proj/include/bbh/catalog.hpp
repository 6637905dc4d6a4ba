#pragma once

#include <string>

#include "bbh/pcgroup.hpp"

namespace bbh {

/// Abelian p-group with the given invariant factors (each a power of p).
PcGroup abelian_pc_group(int p, const std::vector<std::uint64_t>& factors);

/// Extraspecial group of order p^3 and exponent p.
PcGroup extraspecial_pc_group(int p);

/// Named test groups: `1`, `Z3`, `Z9xZ3`, `Z3^2`, `E27` (extraspecial, p^3 with
/// p taken from the name), `Q2_2` for Q_c(F_g) written `Q<g>_<c>`, or
/// `@path` for a cached presentation.
PcGroup group_from_spec(const std::string& spec, int p, const Caps& caps = {});

}  // namespace bbh
