#![allow(clippy::excessive_precision)]

/// `(x, K0(x), K1(x))` at 40 log-spaced points in `[1e-3, 50]`, computed with
/// 40-digit arithmetic (mpmath `besselk`) and rounded to 30 digits.
pub const TABLE: [(f64, f64, f64); 40] = [
    (0.001, 7.02368880056238134361208006301, 9.99996238156085574277953404016e+2),
    (0.00131973, 6.74626299730993100686483436976, 7.57725966401765498867382518874e+2),
    (0.0017417, 6.46883081109163537614840237825, 5.74145622072801575801940803729e+2),
    (0.00229858, 6.19140475255793959551900122147, 4.35043515167591176834885839269e+2),
    (0.00303351, 5.91398233562935549081865409783, 3.29641401780748956592034959403e+2),
    (0.00400343, 5.63656189267974367868954038232, 2.49773525046689223035074767921e+2),
    (0.00528346, 5.35914998712096262079403624123, 1.89254432012226780554973350765e+2),
    (0.00697276, 5.08174958753646780748252296813, 1.43395773015823822182254253522e+2),
    (0.00920219, 4.80436817245087374535524434116, 1.08645378409170986852174586042e+2),
    (0.0121444, 4.52702242121870347875579311177, 8.23119543431632231104900540706e+1),
    (0.0160274, 4.24972415540609940875236611967, 6.23550901496629455889080458878e+1),
    (0.021152, 3.97250846978455823991425599555, 4.72295547960933893813911736486e+1),
    (0.027915, 3.69543721359480461187218563328, 3.57644824390593097739952467543e+1),
    (0.0368403, 3.41859331014182888481156399298, 2.70720191553312783596463461244e+1),
    (0.0486194, 3.14211095374529362109533161269, 2.04794107684363151189059950508e+1),
    (0.0641647, 2.86621004378651778796551077636, 1.54769569876394132634986596233e+1),
    (0.0846803, 2.5912335240510332307207220468, 1.16783654344055278229833047896e+1),
    (0.111756, 2.31770492051521942224754723288, 8.79088476164627555968547704153),
    (0.147488, 2.04644344530453477759497973916, 6.59298637954440621592234512527),
    (0.194644, 1.77865821545071700245070590792, 4.91697895544266507484076155442),
    (0.256879, 1.51611515343124726816098504873, 3.63630876633725654967485951087),
    (0.339012, 1.26135358922991712757000907622, 2.65599213094799430737956634235),
    (0.447405, 1.01784074900005483959243199872, 1.90513519855574447674636310507),
    (0.590456, 7.90092095771609608729296736375e-1, 1.33143440745351738641199163821),
    (0.779245, 5.8359364115223004729161205932e-1, 8.96814780206755562453684936686e-1),
    (1.0284, 4.04334472084095822143281010267e-1, 5.73729823671642434327244854227e-1),
    (1.35721, 2.57827486817971522017799474118e-1, 3.41844694089663839087890998224e-1),
    (1.79115, 1.47557346632253029517284217266e-1, 1.84827308922441675942374560615e-1),
    (2.36385, 7.33138035556276365576380528232e-2, 8.76188228593606420367339473621e-2),
    (3.11965, 3.02626275953928692761053733022e-2, 3.48100712308935891480236177955e-2),
    (4.11711, 9.79131156255365255823286806912e-3, 1.09212113694065396131559618379e-2),
    (5.43349, 2.29919110723030392671408502079e-3, 2.50244485214969297148859464074e-3),
    (7.17076, 3.53956231025536324017243485879e-4, 3.77875794889226830762027176583e-4),
    (9.46349, 3.12342161081667196396849409109e-5, 3.28448477818176515453267390232e-5),
    (12.4893, 1.32303464287366670355474953698e-6, 1.37501687131984169602479078582e-6),
    (16.4825, 2.12858072861605927970328592416e-8, 2.19222667670926079492781425019e-8),
    (21.7526, 9.5461741995726054880102431988e-11, 9.76318673125578814549415261587e-11),
    (28.7076, 7.93688344203038836014753727601e-14, 8.07395603733883437342088622438e-14),
    (37.8864, 7.13755283459394053716739643285e-18, 7.23114379290732174320758331791e-18),
    (50.0, 3.41016774978949551392067551235e-23, 3.44410222671755561259185303591e-23),
];
