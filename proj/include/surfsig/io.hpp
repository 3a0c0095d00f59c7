#pragma once

#include <iosfwd>
#include <string>

#include "surfsig/crossed_module.hpp"
#include "surfsig/double_group.hpp"
#include "surfsig/graded_tensor.hpp"
#include "surfsig/matrix_holonomy.hpp"
#include "surfsig/path_signature.hpp"
#include "surfsig/surface_grid.hpp"

namespace surfsig {

// Numbers are written in shortest round-trip form, so write -> read -> write
// is byte-identical. Parse errors name the source and the line.

// d,n_s,n_t,s_min,s_max,t_min,t_max header line, its values, then i,j,v1..vd
// per sample in any order.
SurfaceGrid read_grid(std::istream& is, const std::string& source = "<grid>");
void write_grid(std::ostream& os, const SurfaceGrid& g);

// one sample per line: u,v1..vd with u strictly increasing
PiecewiseLinearPath read_path(std::istream& is, const std::string& source = "<path>");
void write_path(std::ostream& os, const PiecewiseLinearPath& p);

// d=<d> N=<N>, then level,word,coefficient with the word as a digit string
void write_tensor(std::ostream& os, const GradedTensor0& a);
GradedTensor0 read_tensor(std::istream& is, const std::string& source = "<tensor>");

// d=<d> N=<N> unit=<u>, then level,index,coefficient in frame coordinates
void write_tensor1(std::ostream& os, const Tensor1Hat& E);
Tensor1Hat read_tensor1(std::istream& is, const std::string& source = "<tensor1>");
// level,column,bar_index,bar_word,value for the nonzero frame entries
void write_frame(std::ostream& os, int d, int N);

// sections [x] [y] [z] [w] [E]
void write_square(std::ostream& os, const Square& S);
Square read_square(std::istream& is, const std::string& source = "<square>");

// {"n","m","p","d","beta":{"1":rows},"alpha":{...},"gamma":{"12":rows}}
ChainConnection read_connection(std::istream& is, const std::string& source = "<connection>");
void write_connection(std::ostream& os, const ChainConnection& c);

std::string format_number(double x);

}  // namespace surfsig
