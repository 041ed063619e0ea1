//! End-to-end properties across coding, corruption and detection.

use byzcode_core::adversary::{corrupt_stream_with, AttackMode, AttackModel};
use byzcode_core::algebra::FieldSpec;
use byzcode_core::detect::{
    gen_hash_verify, oracle_verify, sig_keygen, sig_verify, signing_field, HashParams, SigVerdict, Verdict,
};
use byzcode_core::rlnc::{decode, random_combine, random_generation, GenerationParams};
use byzcode_core::sim::default_signing_group;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recoded_traffic_decodes_and_passes_the_hash(seed in any::<u64>(), g in 1usize..10, width in 4u8..=16) {
        let f = FieldSpec::binary(width).unwrap();
        let hash = HashParams::new(8, 1, f).unwrap();
        let params = GenerationParams::new(f, g, 20, Some(hash.clone())).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (gen, _) = random_generation(seed, params, &mut rng);
        let first_hop = gen.encode_innovative(&mut rng);
        let second_hop: Vec<_> = (0..g + 2).map(|_| random_combine(&first_hop, &mut rng).unwrap()).collect();
        for p in &second_hop {
            prop_assert!(oracle_verify(&p.vector, &gen));
        }
        if let Ok(decoded) = decode(&second_hop, g) {
            prop_assert_eq!(&decoded.payloads, &gen.source_payloads);
            prop_assert_eq!(gen_hash_verify(&decoded, &hash).unwrap(), Verdict::Valid);
        }
    }

    #[test]
    fn signature_tracks_span_membership(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let group = default_signing_group();
        let params = GenerationParams::new(signing_field(group).unwrap(), 4, 6, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (gen, sources) = random_generation(1, params, &mut rng);
        let key = sig_keygen(&gen, group, &mut rng).unwrap();
        let coded: Vec<_> = (0..12).map(|_| random_combine(&sources, &mut rng).unwrap()).collect();
        let model = AttackModel::new(p, AttackMode::RandomPayload, seed).unwrap();
        for packet in corrupt_stream_with(coded, &model, &mut rng) {
            let accepted = sig_verify(&packet.vector, &key).unwrap() == SigVerdict::Accept;
            prop_assert_eq!(accepted, oracle_verify(&packet.vector, &gen));
            prop_assert_eq!(accepted, !packet.is_corrupted());
        }
    }
}
