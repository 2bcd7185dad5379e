/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: tools/wlfit.cpp
 *
 * Copyright 2026 The wlfit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "wlfit/io/cli.hpp"

#include <iostream>

int main(int argc, char* argv[])
{
    return wlfit::io::run_cli(argc, argv, std::cout, std::cerr);
}
