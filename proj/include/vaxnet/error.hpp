/*
 * Copyright (C) 2026 The vaxnet Authors
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
#ifndef VAXNET_ERROR_HPP
#define VAXNET_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vaxnet
{

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Input text could not be parsed; line() is 1-based, 0 when not line-specific.
class ParseError : public Error
{
  public:
    ParseError(std::size_t line, std::string const& what)
        : Error("line " + std::to_string(line) + ": " + what), line_{line}
    {
    }

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// An operation was called on inputs outside its domain.
class PreconditionError : public Error
{
  public:
    using Error::Error;
};

} // namespace vaxnet

#endif
