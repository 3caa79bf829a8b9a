//! Binary caches for sequence and sample sets.
//!
//! Sequence set layout (little-endian):
//!
//! ```text
//! "CRP1" | u32 vocab_size | u32 n_sequences
//! n_sequences x ( u32 len | i64 end_time | len x u32 item )
//! vocab_size  x ( u32 byte_len | utf-8 bytes )
//! ```
//!
//! Sample set layout:
//!
//! ```text
//! "CRS1" | u32 n_samples
//! n_samples x ( u32 id | u32 label | i64 origin_end_time | u32 len | len x u32 item )
//! ```

use std::io::{Read, Write};

use super::{Sample, SampleSet, Sequence, SequenceSet, Vocab};
use crate::io::*;
use crate::Result;

const SEQUENCE_MAGIC: &[u8; 4] = b"CRP1";
const SAMPLE_MAGIC: &[u8; 4] = b"CRS1";

pub fn write_sequence_set<W: Write>(w: &mut W, set: &SequenceSet) -> Result<()> {
    w.write_all(SEQUENCE_MAGIC)?;
    write_u32(w, len_u32(set.n_items())?)?;
    write_u32(w, len_u32(set.len())?)?;
    for seq in &set.sequences {
        write_u32(w, len_u32(seq.items.len())?)?;
        write_i64(w, seq.end_time)?;
        for &item in &seq.items {
            write_u32(w, item)?;
        }
    }
    for id in set.vocab.ids() {
        write_str(w, id)?;
    }
    Ok(())
}

pub fn read_sequence_set<R: Read>(r: &mut R) -> Result<SequenceSet> {
    expect_magic(r, SEQUENCE_MAGIC)?;
    let vocab_size = read_u32(r)? as usize;
    let n_sequences = read_u32(r)? as usize;
    let mut sequences = Vec::with_capacity(n_sequences.min(1 << 20));
    for id in 0..n_sequences {
        let len = read_u32(r)? as usize;
        let end_time = read_i64(r)?;
        let items = (0..len).map(|_| read_u32(r)).collect::<Result<Vec<_>>>()?;
        sequences.push(Sequence {
            id: id as u32,
            items,
            end_time,
        });
    }
    let vocab = Vocab::from_ids((0..vocab_size).map(|_| read_str(r)).collect::<Result<Vec<_>>>()?)?;
    SequenceSet::new(sequences, vocab)
}

pub fn write_sample_set<W: Write>(w: &mut W, set: &SampleSet) -> Result<()> {
    w.write_all(SAMPLE_MAGIC)?;
    write_u32(w, len_u32(set.len())?)?;
    for s in &set.samples {
        write_u32(w, s.id)?;
        write_u32(w, s.label)?;
        write_i64(w, s.origin_end_time)?;
        write_u32(w, len_u32(s.prefix.len())?)?;
        for &item in &s.prefix {
            write_u32(w, item)?;
        }
    }
    Ok(())
}

pub fn read_sample_set<R: Read>(r: &mut R) -> Result<SampleSet> {
    expect_magic(r, SAMPLE_MAGIC)?;
    let n = read_u32(r)? as usize;
    let mut samples = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let id = read_u32(r)?;
        let label = read_u32(r)?;
        let origin_end_time = read_i64(r)?;
        let len = read_u32(r)? as usize;
        let prefix = (0..len).map(|_| read_u32(r)).collect::<Result<Vec<_>>>()?;
        samples.push(Sample {
            id,
            prefix,
            label,
            origin_end_time,
        });
    }
    Ok(SampleSet { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn sequence_set_round_trips(lists in prop::collection::vec(
            prop::collection::vec("[a-f]{1,3}", 1..6), 1..8)) {
            let set = SequenceSet::from_id_lists(&lists);
            let mut buf = Vec::new();
            write_sequence_set(&mut buf, &set).unwrap();
            let back = read_sequence_set(&mut buf.as_slice()).unwrap();
            prop_assert_eq!(&back, &set);
            for id in set.vocab.ids() {
                prop_assert_eq!(back.vocab.decode(back.vocab.encode(id).unwrap()), Some(id.as_str()));
            }
        }
    }

    #[test]
    fn header_layout() {
        let set = SequenceSet::from_id_lists(&[vec!["a", "b"]]);
        let mut buf = Vec::new();
        write_sequence_set(&mut buf, &set).unwrap();
        assert_eq!(&buf[..4], b"CRP1");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 2);
    }

    #[test]
    fn sample_set_round_trips() {
        let set = SampleSet {
            samples: vec![Sample {
                id: 0,
                prefix: vec![3, 1],
                label: 2,
                origin_end_time: 99,
            }],
        };
        let mut buf = Vec::new();
        write_sample_set(&mut buf, &set).unwrap();
        assert_eq!(read_sample_set(&mut buf.as_slice()).unwrap(), set);
    }

    #[test]
    fn wrong_magic_rejected() {
        assert!(matches!(
            read_sequence_set(&mut &b"CRG1\0\0\0\0"[..]),
            Err(Error::Cache(_))
        ));
    }
}
