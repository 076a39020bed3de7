/*
 * Copyright 2026 The cohs-cqg Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef COHS_ERRORS_H_
#define COHS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace cohs {

// Root of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define COHS_DEFINE_ERROR(Name)            \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// corpus
COHS_DEFINE_ERROR(EmptyContextError);
COHS_DEFINE_ERROR(SchemaError);
COHS_DEFINE_ERROR(ParseError);
COHS_DEFINE_ERROR(LocateError);
COHS_DEFINE_ERROR(IndexError);

// relevance
COHS_DEFINE_ERROR(DimError);
COHS_DEFINE_ERROR(ZeroVectorError);
COHS_DEFINE_ERROR(FormatError);
COHS_DEFINE_ERROR(IoError);

// selector / prompting
COHS_DEFINE_ERROR(EmptyHistoryError);
COHS_DEFINE_ERROR(EmptyWindowError);

// services
COHS_DEFINE_ERROR(ServiceUnavailable);
COHS_DEFINE_ERROR(ProtocolError);

// pipeline
COHS_DEFINE_ERROR(ExhaustedError);

// metrics
COHS_DEFINE_ERROR(EmptyCorpusError);
COHS_DEFINE_ERROR(EmptyInputError);

#undef COHS_DEFINE_ERROR

}  // namespace cohs

#endif  // COHS_ERRORS_H_
