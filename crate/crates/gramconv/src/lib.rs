//! Conversions between grammar-compressed text representations.
//!
//! The crate works with straight-line programs (balanced or not), run-length
//! local grammars, and LZ-like greedy parses, and converts between them
//! without ever materializing the full text:
//!
//! * [`lz_stream`] parses the text of an SLP into its greedy LZ parse by
//!   streaming left to right over a grammar-tree occurrence index.
//! * [`lz_fcpm`] produces the same parse phrase by phrase with exponential
//!   search, extracting each candidate prefix as a small sub-grammar.
//! * [`lcg`] rebuilds a text (or an SLP's text) as a run-length local
//!   grammar whose size is governed by the text's substring complexity.
//! * [`lcg_index`] parses a local grammar's text into the greedy LZ parse
//!   using the grammar's locality instead of a full occurrence grid.
//!
//! Supporting machinery: Karp-Rabin fingerprints ([`fingerprint`]), grammar
//! validation and expansion ([`slp`]), height rebalancing ([`balance`]),
//! pattern-prefix range queries ([`prefix_range`], [`zfast`]), the
//! occurrence grid ([`grid`], [`index`]), text-level file formats
//! ([`format`]), brute-force reference implementations ([`oracles`]) and
//! test corpora ([`corpus`]).

pub mod balance;
pub mod corpus;
pub mod fingerprint;
pub mod grid;
pub mod index;
pub mod lcg;
pub mod lcg_access;
pub mod lz;
pub mod lz_fcpm;
pub mod lz_stream;
pub mod oracles;
pub mod prefix_range;
pub mod slp;
pub mod text;
pub mod zfast;
