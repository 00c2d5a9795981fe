#pragma once

#include <string>
#include <vector>

namespace ainf {

/* Command dispatch: runs one CLI invocation and collects the report text.
 * Returns 0 on pass, 1 on mathematical failure, 2 on input error. */
int dispatch(const std::vector<std::string>& args, std::string& output);

} // namespace ainf
