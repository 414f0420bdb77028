#ifndef NILSPACE_NILSPACE_HPP
#define NILSPACE_NILSPACE_HPP

// Umbrella header: exact arithmetic over small odd-characteristic fields,
// bilinear/Hermitian forms, Witt decomposition, singular flags, maximal
// nilpotent spaces of structured endomorphisms, and the brute-force census
// machinery that cross-checks the dimension bounds and classifications.

#include "nilspace/budget.hpp"
#include "nilspace/field.hpp"
#include "nilspace/flag.hpp"
#include "nilspace/form.hpp"
#include "nilspace/io.hpp"
#include "nilspace/matrix.hpp"
#include "nilspace/nilspaces.hpp"
#include "nilspace/oracle.hpp"
#include "nilspace/subspace.hpp"

#endif
