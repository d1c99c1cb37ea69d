#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ssg/family.hpp"

namespace ssg {

// Images of B's generators under one homomorphism B -> Sym(d).
using Homomorphism = std::vector<Perm>;

// omega_i = (omega_{i1}, ..., omega_{i(d-1)}).
using OmegaLevel = std::vector<Homomorphism>;

struct SpinalData {
  std::string name = "spinal";
  int degree = 3;
  std::vector<int> b_orders;            // B = Z/n_1 x ... x Z/n_m
  std::vector<Perm> a_generators;       // A at level 0; empty means <(1 2 ... d)>
  std::vector<OmegaLevel> preperiod;
  std::vector<OmegaLevel> period;       // nonempty
  std::vector<std::string> unit_names;  // optional, one per nontrivial element of B
};

// Throws CheckFailed naming "homomorphism", "kernel" or "transitivity".
FamilySpec spinal(const SpinalData& data);

// B = (Z/p)^2, omega_{i1} = phi_{k_i} with phi_k(x, y) = x + k y and
// phi_p(x, y) = y; the remaining omega_{ij} are trivial.
FamilySpec grigorchuk_p(int p, const std::vector<int>& k_preperiod, const std::vector<int>& k_period);

// grigorchuk_p(2, period 0 1 2) with the units named b, c, d.
FamilySpec first_grigorchuk();

// B = (Z/p)^m, omega_{i1} = phi o rho^i with the companion-type rho; the
// period is the order of rho.
FamilySpec sunic(int p, int m, const std::vector<int>& a_coeffs);

// B = Z/d, omega_{ij}(1) = a^{eps_j} with a = (1 2 ... d); eps has d-1
// entries. Throws CheckFailed("gcd") unless gcd(eps, d) = 1.
FamilySpec ggs(int d, const std::vector<int>& eps);

FamilySpec fabrykowski_gupta();

// Binary family with rooted alpha and units beta, gamma.
FamilySpec nekrashevych_D(const std::vector<int>& bits_preperiod, const std::vector<int>& bits_period);

// Units b_(a,x) for a in Alt(6) fixing x; self-similar, no rooted letters.
FamilySpec neumann6();

// Order of rho for sunic(p, m, a) (throws past 10^4).
int sunic_period(int p, int m, const std::vector<int>& a_coeffs);

// Every group family of the catalog with representative parameters.
std::vector<std::pair<std::string, FamilySpec>> standard_catalog();

// Ternary spinal groups in the sense needed for the polynomial bound:
// d = 3, A = <(1 2 3)> at every level, omega_{i2} trivial and omega_{i1}
// onto A.
bool is_ternary_spinal(const FamilySpec& spec);

// For each compiled level k, the least l such that the kernels of all
// omega_{ij}, i = k..k+l, intersect trivially; -1 if there is none.
std::vector<int> kernel_depths(const FamilySpec& spec);

}  // namespace ssg
