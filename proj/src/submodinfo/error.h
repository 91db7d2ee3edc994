// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUBMODINFO_ERROR_H_
#define SUBMODINFO_ERROR_H_

#include <stdexcept>
#include <string>

namespace submodinfo {

// Error categories. The numeric values are shared with the C API status
// codes in include/submodinfo/submodinfo.h.
enum class ErrorCode : int {
  kFormat = 10,
  kLookup = 11,
  kDegenerate = 12,
  kConfig = 13,
  kNumeric = 14,
  kUnsupported = 15,
  kSize = 16,
  kIo = 17,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

#define SUBMODINFO_DEFINE_ERROR(Name, Code)                        \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(Code, what) {}  \
  };

SUBMODINFO_DEFINE_ERROR(FormatError, ErrorCode::kFormat)
SUBMODINFO_DEFINE_ERROR(LookupError, ErrorCode::kLookup)
SUBMODINFO_DEFINE_ERROR(DegenerateError, ErrorCode::kDegenerate)
SUBMODINFO_DEFINE_ERROR(ConfigError, ErrorCode::kConfig)
SUBMODINFO_DEFINE_ERROR(NumericError, ErrorCode::kNumeric)
SUBMODINFO_DEFINE_ERROR(UnsupportedError, ErrorCode::kUnsupported)
SUBMODINFO_DEFINE_ERROR(SizeError, ErrorCode::kSize)
SUBMODINFO_DEFINE_ERROR(IoError, ErrorCode::kIo)

#undef SUBMODINFO_DEFINE_ERROR

}  // namespace submodinfo

#endif  // SUBMODINFO_ERROR_H_
