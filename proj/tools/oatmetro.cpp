// Copyright 2026 The oatmetro Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "oat/cli.hpp"

int main(int argc, char** argv)
{
    return oat::cli::run(argc, argv, std::cout, std::cerr);
}
