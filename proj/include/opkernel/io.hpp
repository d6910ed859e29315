#ifndef OPKERNEL_IO_HPP
#define OPKERNEL_IO_HPP

#include <string>

#include <json.hpp>

#include "opkernel/channel.hpp"
#include "opkernel/domination.hpp"
#include "opkernel/kernel.hpp"
#include "opkernel/stinespring.hpp"

namespace opk {

using nlohmann::json;

// Complex scalars are written as two-element arrays [re, im]; indices in
// object keys are 1-based.  Parsing failures and schema violations raise
// MalformedKernelError/InvalidArgumentError so the CLI maps them to exit 2.

json complex_to_json(const Complex& z);
Complex complex_from_json(const json& j, const std::string& where);
json matrix_to_json(const Matrix& mat);
Matrix matrix_from_json(const json& j, const std::string& where);

json algebra_to_json(const Algebra& algebra);
AlgebraPtr algebra_from_json(const json& j);

json kernel_to_json(const OperatorKernel& K);
OperatorKernel kernel_from_json(const json& j);

json factorization_to_json(const Factorization& fact);
Factorization factorization_from_json(const json& j,
                                      const OperatorKernel& owner);

json certificate_to_json(const DominationCertificate& cert);
DominationCertificate certificate_from_json(const json& j);

json witness_to_json(const Witness& witness);

json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
std::string dump_json(const json& j);

}  // namespace opk

#endif  // OPKERNEL_IO_HPP
