#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "algwb/algebra.hpp"

namespace algwb::corpus {

/// Group in the signature (*, inv, e) from a multiplication table.
Algebra group_from_table(std::string name, std::size_t n, const std::function<Elem(Elem, Elem)>& mul);

/// Z_n in the signature (+, -, 0).
Algebra cyclic_group(std::size_t n);
/// Z_2 x Z_2 in the signature (+, -, 0).
Algebra klein_group();
/// Z_a x Z_b as groups, signature (+, -, 0), element x = i*b + j.
Algebra abelian_product(std::size_t a, std::size_t b);

/// Permutations of {0,1,2} in lexicographic order, composition (p*q)(i) = p(q(i)).
Algebra symmetric_group3();
/// S3 with one nullary operation per element.
Algebra symmetric_group3_with_constants();
/// Symmetries of the square, element r^i s^j encoded as 2i + j.
Algebra dihedral_group4();

Algebra two_element_lattice();
Algebra two_element_semilattice();
/// One element, no operations.
Algebra trivial_algebra();
/// One element in the group signature.
Algebra trivial_group();

/// Adds one nullary operation per element.
Algebra with_all_constants(const Algebra& A);

/// A3 as a block partition of S3 (index-2 normal subgroup and its coset).
Partition s3_alternating_partition();

}  // namespace algwb::corpus
