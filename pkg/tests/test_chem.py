"""Parser, reaction, component-splitting and molecular weight tests."""

import pytest

from chemvecrag.chem import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_SINGLE,
    BadBracketAtom,
    SmilesParseError,
    TokenLimitExceeded,
    UnbalancedParenthesis,
    UnclosedRing,
    UnknownElement,
    ValenceError,
    WrongSeparatorCount,
    count_tokens,
    molecular_weight,
    parse_reaction,
    parse_smiles,
    split_components,
)

from helpers import load_corpus


class TestParseSmiles:
    def test_ethanol(self):
        g = parse_smiles("CCO")
        assert len(g.atoms) == 3
        assert len(g.bonds) == 2
        assert all(b.order == BOND_SINGLE for b in g.bonds)
        assert [a.hydrogens for a in g.atoms] == [3, 2, 1]

    def test_benzene_aromatic_ring(self):
        g = parse_smiles("c1ccccc1")
        assert len(g.atoms) == 6
        assert all(a.aromatic for a in g.atoms)
        assert all(b.order == BOND_AROMATIC for b in g.bonds)
        assert len(g.bonds) == 6

    def test_wildcards_with_map_numbers(self):
        g = parse_smiles("[*:1]CC[*:2]")
        assert len(g.atoms) == 4
        wild = [a for a in g.atoms if a.is_wildcard]
        assert sorted(a.map_number for a in wild) == [1, 2]

    def test_unclosed_ring(self):
        with pytest.raises(UnclosedRing) as exc:
            parse_smiles("C1CC")
        assert exc.value.offset == 1

    def test_unbalanced_open(self):
        with pytest.raises(UnbalancedParenthesis) as exc:
            parse_smiles("CC(C")
        assert exc.value.offset == 2

    def test_unbalanced_close(self):
        with pytest.raises(UnbalancedParenthesis) as exc:
            parse_smiles("CC)C")
        assert exc.value.offset == 2

    def test_figure_query_as_printed_is_rejected(self):
        # Unbalanced parentheses as printed in the source figure.
        with pytest.raises(UnbalancedParenthesis):
            parse_smiles("O=S(C1=CC=C(O[*:1])C=C1)(C2=CC=C[*:2])C=C2)=O")

    def test_repaired_figure_query_parses(self):
        g = parse_smiles("O=S(C1=CC=C(O[*:1])C=C1)(C2=CC=C([*:2])C=C2)=O")
        assert g.has_wildcard

    def test_unknown_element(self):
        with pytest.raises(UnknownElement) as exc:
            parse_smiles("CXC")
        assert exc.value.offset == 1

    def test_unknown_bracket_element(self):
        with pytest.raises(UnknownElement):
            parse_smiles("[Xx]")

    def test_bare_element_needing_brackets(self):
        with pytest.raises(UnknownElement):
            parse_smiles("CAl")

    def test_bad_bracket(self):
        with pytest.raises(BadBracketAtom):
            parse_smiles("C[C")
        with pytest.raises(BadBracketAtom):
            parse_smiles("[]")
        with pytest.raises(BadBracketAtom):
            parse_smiles("[C!]")

    def test_bracket_atom_fields(self):
        g = parse_smiles("[13CH3+]")
        atom = g.atoms[0]
        assert atom.isotope == 13
        assert atom.hydrogens == 3
        assert atom.charge == 1
        g = parse_smiles("[O-2]")
        assert g.atoms[0].charge == -2
        g = parse_smiles("[N++]")
        assert g.atoms[0].charge == 2

    def test_charge_range(self):
        with pytest.raises(BadBracketAtom):
            parse_smiles("[C+9]")

    def test_two_letter_organic(self):
        g = parse_smiles("ClCBr")
        assert [a.element for a in g.atoms] == ["Cl", "C", "Br"]

    def test_percent_ring_closure(self):
        g = parse_smiles("C%10CCCCC%10")
        assert len(g.bonds) == 6

    def test_bond_orders(self):
        g = parse_smiles("C=C")
        assert g.bonds[0].order == BOND_DOUBLE
        g = parse_smiles("C#N")
        assert g.bonds[0].order == "triple"

    def test_ring_bond_order_on_closure(self):
        # Bond symbol before the ring-closure digit, on either side.
        g = parse_smiles("C=1CCCCC=1")
        ring_bond = [b for b in g.bonds if {b.a, b.b} == {0, 5}][0]
        assert ring_bond.order == BOND_DOUBLE
        with pytest.raises(SmilesParseError):
            parse_smiles("C=1CCCCC#1")

    def test_aromatic_bond_explicit(self):
        g = parse_smiles("C:C")
        assert g.bonds[0].order == BOND_AROMATIC

    def test_stereo_annotations_preserved(self):
        g = parse_smiles("C/C=C/C")
        stereo = [b.stereo for b in g.bonds]
        assert stereo.count("/") == 2
        g = parse_smiles("N[C@@H](C)C(=O)O")
        assert g.atoms[1].stereo == "@@"

    def test_valence_error(self):
        with pytest.raises(ValenceError):
            parse_smiles("C(C)(C)(C)(C)C")
        with pytest.raises(ValenceError):
            parse_smiles("O=C=O=C")

    def test_implicit_hydrogens_heteroaromatics(self):
        assert [a.hydrogens for a in parse_smiles("c1ccncc1").atoms] == [1, 1, 1, 0, 1, 1]
        assert parse_smiles("c1ccoc1").atoms[3].hydrogens == 0
        assert parse_smiles("c1cc[nH]c1").atoms[3].hydrogens == 1
        # aromatic carbonyl carbon carries no extra pi increment
        g = parse_smiles("Cn1cnc2c1c(=O)n(C)c(=O)n2C")
        assert all(a.hydrogens >= 0 for a in g.atoms)

    def test_empty_and_whitespace(self):
        with pytest.raises(SmilesParseError):
            parse_smiles("")
        with pytest.raises(SmilesParseError):
            parse_smiles("C C")

    def test_token_cap(self):
        with pytest.raises(TokenLimitExceeded):
            parse_smiles("C" * 50, max_tokens=10)
        assert count_tokens("CCO") == 3
        assert count_tokens("[*:1]CC[*:2]") == 4
        assert count_tokens("c1ccccc1") == 8

    def test_duplicate_bond_rejected(self):
        with pytest.raises(SmilesParseError):
            parse_smiles("C1C1")
        with pytest.raises(SmilesParseError):
            parse_smiles("C12CC12")

    def test_corpus_parses(self):
        for smiles, _, _ in load_corpus():
            g = parse_smiles(smiles)
            assert g.atom_count >= 1


class TestParseReaction:
    def test_simple(self):
        rxn = parse_reaction("CC=O>>CCO")
        assert len(rxn.reactants) == 1
        assert len(rxn.agents) == 0
        assert len(rxn.products) == 1

    def test_with_agent(self):
        rxn = parse_reaction("CC=O>[H][H]>CCO")
        assert len(rxn.agents) == 1

    def test_wrong_separator_count(self):
        with pytest.raises(WrongSeparatorCount):
            parse_reaction("CC=O>CCO")
        with pytest.raises(WrongSeparatorCount):
            parse_reaction("A>B>C>D")

    def test_side_labels_in_errors(self):
        with pytest.raises(SmilesParseError) as exc:
            parse_reaction("CC=O>>C1CC")
        assert "products" in str(exc.value)

    def test_multi_component_sides(self):
        rxn = parse_reaction("CCO.OC>>CC.O.N")
        assert len(rxn.reactants) == 2
        assert len(rxn.products) == 3

    def test_empty_sides_allowed(self):
        rxn = parse_reaction(">>CCO")
        assert rxn.reactants == ()
        assert len(rxn.products) == 1


class TestSplitComponents:
    def test_split(self):
        assert split_components("CCO.O") == ["CCO", "O"]

    def test_identity(self):
        assert split_components("CCO") == ["CCO"]

    def test_ring_across_dot_rejected(self):
        with pytest.raises(UnclosedRing):
            split_components("C1.CC1")

    def test_order_preserved(self):
        assert split_components("O.CCO.N") == ["O", "CCO", "N"]


class TestMolecularWeight:
    # Oracle: independent sums over the standard atomic weight table,
    # hydrogens counted by hand.
    CASES = {
        "C": 12.011 + 4 * 1.008,          # methane
        "O": 15.999 + 2 * 1.008,          # water
        "CCO": 2 * 12.011 + 15.999 + 6 * 1.008,
        "c1ccccc1": 6 * 12.011 + 6 * 1.008,
        "[Na+].[Cl-]": 22.9898 + 35.45,
    }

    def test_against_hand_sums(self):
        for smiles, expected in self.CASES.items():
            assert molecular_weight(parse_smiles(smiles)) == pytest.approx(expected, abs=1e-9)

    def test_spec_reference_values(self):
        assert molecular_weight(parse_smiles("C")) == pytest.approx(16.04, abs=0.01)
        assert molecular_weight(parse_smiles("O")) == pytest.approx(18.02, abs=0.01)

    def test_wildcard_is_massless(self):
        assert molecular_weight(parse_smiles("[*:1]")) == 0.0
        with_wildcard = molecular_weight(parse_smiles("[*:1]CC[*:2]"))
        # wildcards contribute nothing; CH2-CH2 remains
        assert with_wildcard == pytest.approx(2 * 12.011 + 4 * 1.008, abs=1e-9)

    def test_additivity_over_components(self):
        pairs = [("CCO", "O"), ("c1ccccc1", "CC(=O)O"), ("[Na+]", "[Cl-]")]
        for a, b in pairs:
            joined = molecular_weight(parse_smiles(f"{a}.{b}"))
            split = sum(molecular_weight(parse_smiles(p)) for p in split_components(f"{a}.{b}"))
            assert joined == pytest.approx(split, abs=1e-9)
