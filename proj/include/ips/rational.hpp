#ifndef IPS_RATIONAL_HPP
#define IPS_RATIONAL_HPP

#include <gmpxx.h>
#include <string>

namespace ips {

// Exact rational arithmetic. Every rate, condition value and coupling term
// in this library is an mpq; doubles appear only inside the event sampler.
using Rat = mpq_class;

// Parses "num/den" or "num". Throws std::invalid_argument on garbage or
// zero denominators.
Rat rat_parse(const std::string& s);

// Canonical "num/den" form, denominator always present ("3/1", "-1/2").
std::string rat_str(const Rat& r);

Rat rat_min(const Rat& a, const Rat& b);
Rat rat_max(const Rat& a, const Rat& b);

// Exact rational from a double (doubles are dyadic, so this is lossless).
Rat rat_from_double(double x);

}  // namespace ips

#endif
